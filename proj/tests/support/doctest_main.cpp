#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdlib>

#include "intentforge/logging.hpp"

int main(int argc, char** argv) {
  setenv("INTENTFORGE_LOG", "warn", 0);
  intentforge::init_logging("warn");
  return doctest::Context(argc, argv).run();
}
