#include "polarmi/cli.hpp"

int main(int argc, char** argv) {
  return polarmi::cli::main_entry(argc, argv);
}
