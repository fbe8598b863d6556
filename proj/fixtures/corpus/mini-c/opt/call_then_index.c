int helper(int x) { return x + 1; }
int driver() {
  int buf[8] = {1, 2, 3, 4, 5, 6, 7, 8};
  int t = helper(3);
  t = t + buf[2];
  return t;
}
