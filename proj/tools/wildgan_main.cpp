#include <exception>
#include <iostream>

#include "wildgan/cli.hpp"
#include "wildgan/error.hpp"

int main(int argc, char** argv) {
  try {
    return wildgan::run_cli(argc, argv);
  } catch (const wildgan::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const wildgan::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 4;
  } catch (const wildgan::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
