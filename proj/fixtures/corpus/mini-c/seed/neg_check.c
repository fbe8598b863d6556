int sign(int x) {
  int s = 0;
  if (x < 0) { s = 0 - 1; } else { s = 1; }
  return s;
}
