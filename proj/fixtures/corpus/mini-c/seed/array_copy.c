int copy() {
  int src[3] = {7, 8, 9};
  int dst[3] = {0, 0, 0};
  for (int i = 0; i < 3; i = i + 1) { dst[i] = src[i]; }
  return dst[2];
}
