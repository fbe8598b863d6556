int pick(int flag) {
  int left = 2;
  int right = 7;
  if (flag > 0) { left = left + right; } else { right = right - left; }
  return left + right;
}
