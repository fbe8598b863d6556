int clamp() {
  int v = 17;
  if (v > 10) { v = v - 10; } else { v = v + 10; }
  for (int i = 0; i < 3; i = i + 1) { v = v * 2; }
  for (int j = 0; j < 3; j = j + 1) { v = v - 1; }
  return v;
}
