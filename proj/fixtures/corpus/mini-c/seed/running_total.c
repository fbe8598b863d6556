int main() {
  int total = 0;
  int extra = 5;
  for (int i = 0; i < 12; i = i + 1) { total = total + i; }
  return total + extra;
}
