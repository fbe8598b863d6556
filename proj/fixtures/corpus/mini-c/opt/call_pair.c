int step(int x) { return x * 3; }
int pipeline() {
  int a = step(1);
  int b = step(a);
  return a + b;
}
