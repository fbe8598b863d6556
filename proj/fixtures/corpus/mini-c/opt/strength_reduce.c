int reduce() {
  int s = 0;
  int t = 0;
  for (int i = 0; i < 16; i = i + 1) { s = s + 8; }
  for (int j = 0; j < 16; j = j + 1) { t = t + s; }
  if (1) { int w = 2 * 2; t = t + w; } else { int u = 3 * 3; t = t - u; }
  return t;
}
