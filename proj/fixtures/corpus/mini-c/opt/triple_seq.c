int stages() {
  int a = 0;
  int b = 0;
  int c = 0;
  for (int i = 0; i < 4; i = i + 1) { a = a + 1; }
  for (int j = 0; j < 4; j = j + 1) { b = b + 2; }
  for (int k = 0; k < 4; k = k + 1) { c = c + 3; }
  return a + b + c;
}
