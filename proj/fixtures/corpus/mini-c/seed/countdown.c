int countdown() {
  int n = 20;
  int steps = 0;
  while (n > 0) { n = n - 1; steps = steps + 1; }
  return steps;
}
