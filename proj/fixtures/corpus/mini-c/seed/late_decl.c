int late() {
  int first = 4;
  int second = first * 2;
  int third = second - first;
  return third;
}
