int mask() {
  int bits = 0xff;
  int out = 0;
  while (bits > 0) { out = out + bits % 2; bits = bits / 2; }
  return out;
}
