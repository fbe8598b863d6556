int fill() {
  int data[4] = {9, 9, 9, 9};
  int sum = 0;
  for (int i = 0; i < 4; i = i + 1) { sum = sum + data[i]; }
  for (int j = 0; j < 4; j = j + 1) { sum = sum - 1; }
  return sum;
}
