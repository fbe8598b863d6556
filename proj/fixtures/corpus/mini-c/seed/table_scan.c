int scan_table() {
  int table[4] = {3, 1, 4, 1};
  int best = 0;
  for (int i = 0; i < 4; i = i + 1) {
    if (table[i] > best) { best = table[i]; }
  }
  return best;
}
