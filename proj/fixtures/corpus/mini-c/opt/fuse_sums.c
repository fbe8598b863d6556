int fuse_sums() {
  int acc1 = 0;
  int acc2 = 0;
  for (int i = 0; i < 64; i = i + 1) { acc1 = acc1 + 2; }
  for (int j = 0; j < 64; j = j + 1) { acc2 = acc2 + 3; }
  return acc1 + acc2;
}
