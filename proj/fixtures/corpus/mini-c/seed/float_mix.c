float blend() {
  float a = 1.5;
  float b = 2.25;
  int w = 3;
  for (int i = 0; i < w; i = i + 1) { a = a + b; }
  return a;
}
