int toggle() {
  int state = 0;
  int flips = 9;
  do { state = 1 - state; flips = flips - 1; } while (flips > 0);
  return state;
}
