#include "tempsense/cli.hpp"

int main(int argc, char** argv) {
    return tempsense::cli::run(argc, argv);
}
