int spin() {
  int outer = 4;
  int acc = 0;
  while (outer > 0) {
    int inner = 4;
    while (inner > 0) { acc = acc + inner; inner = inner - 1; }
    outer = outer - 1;
  }
  return acc;
}
