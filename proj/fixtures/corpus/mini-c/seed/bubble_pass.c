int one_pass() {
  int v[4] = {4, 2, 3, 1};
  int swaps = 0;
  for (int i = 0; i < 3; i = i + 1) {
    if (v[i] > v[i + 1]) { swaps = swaps + 1; }
  }
  return swaps;
}
