int interchange() {
  int total = 0;
  for (int i = 0; i < 8; i = i + 1) {
    for (int j = 0; j < i; j = j + 1) {
      j = j + i;
    }
  }
  total = total + 8;
  return total;
}
