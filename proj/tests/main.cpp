#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdlib>
#include <filesystem>

int main(int argc, char** argv) {
  // keep test outputs out of the working directory unless told otherwise
  if (!std::getenv("CHSYS_OUTPUT_ROOT")) {
    const auto root = std::filesystem::temp_directory_path() / "chsys_unit";
    setenv("CHSYS_OUTPUT_ROOT", root.c_str(), 0);
  }
  doctest::Context ctx(argc, argv);
  return ctx.run();
}
