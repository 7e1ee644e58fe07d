// Writes the standard fixture patient directory: make_fixture DIR [VOLUME_SIZE]
#include "fixtures.hpp"

#include <cstdlib>
#include <iostream>

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: make_fixture DIR [VOLUME_SIZE]\n";
    return 2;
  }
  imhotep::testing::FixtureOptions opts;
  if (argc > 2) opts.volume_size = std::atoi(argv[2]);
  imhotep::testing::build_fixture_patient(argv[1], opts);
  return 0;
}
