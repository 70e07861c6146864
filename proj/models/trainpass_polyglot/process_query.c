void ProcessQuery(void) {
  if (request->value < 3) {
    lf_set(response, rand() % 2);
  } else {
    lf_set(response, true);
  }
}
