int compute() {
  int acc1 = 0;
  int acc2 = 0;
  for (int i = 0; i < 16; i = i + 1) { acc1 = acc1 + 2; }
  for (int j = 0; j < 16; j = j + 1) { acc2 = acc2 + 3; }
  return acc1;
}
