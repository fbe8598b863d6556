int inc(int v) { return v + 1; }
int main() {
  int n = 0;
  int lim = 4;
  while (n < lim) { n = inc(n); }
  return n;
}
