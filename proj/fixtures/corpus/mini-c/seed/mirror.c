int mirror() {
  int fwd = 0;
  int rev = 0;
  for (int i = 0; i < 6; i = i + 1) { fwd = fwd + i; }
  if (fwd > 10) { rev = fwd - 10; } else { rev = 10 - fwd; }
  return rev;
}
