int main() {
  int sum1 = 0;
  int sum2 = 0;
  for (int i = 0; i < 8; i = i + 1) { sum1 = sum1 + i; }
  return sum1;
}
