int fuse_products() {
  int p = 1;
  int q = 1;
  int n = 10;
  while (n > 0) { p = p * 2; n = n - 1; }
  while (p > 1) { q = q + p; p = p / 2; }
  return q;
}
