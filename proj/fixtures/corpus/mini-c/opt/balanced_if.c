int select_path() {
  int r = 0;
  if (1) { int hi = 10 + 20; r = hi; } else { int lo = 5 - 2; r = lo; }
  return r;
}
