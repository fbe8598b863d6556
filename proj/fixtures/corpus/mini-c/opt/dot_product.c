int dot() {
  int xs[4] = {1, 2, 3, 4};
  int ys[4] = {4, 3, 2, 1};
  int s1 = 0;
  int s2 = 0;
  for (int i = 0; i < 4; i = i + 1) { s1 = s1 + xs[i]; }
  for (int j = 0; j < 4; j = j + 1) { s2 = s2 + ys[j]; }
  return s1 * s2;
}
