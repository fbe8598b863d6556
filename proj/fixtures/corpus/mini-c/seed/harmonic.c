float harmonic() {
  float h = 0.0;
  for (int k = 1; k < 6; k = k + 1) { h = h + 1.0 / k; }
  return h;
}
