int echo(int v) { return v; }
int main() {
  int x = echo(41);
  x = x + 1;
  return x;
}
