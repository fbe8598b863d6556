int average() {
  int sum = 0;
  int count = 10;
  for (int i = 0; i < 10; i = i + 1) { sum = sum + i; }
  return sum / count;
}
