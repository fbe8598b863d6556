int game() {
  int score = 0;
  int round = 11;
  for (int t = 0; t < round; t = t + 1) { score = score + t % 3; }
  return score;
}
