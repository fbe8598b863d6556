int folded() {
  int a = 2 + 3 * 4;
  int b = a - 6;
  int c = b / 2;
  return c;
}
