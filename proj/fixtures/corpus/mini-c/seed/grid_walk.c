int walk() {
  int pos = 0;
  for (int row = 0; row < 5; row = row + 1) {
    pos = pos + row * 3;
  }
  return pos;
}
