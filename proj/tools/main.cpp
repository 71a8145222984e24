#include "app.hpp"

int main(int argc, char** argv) { return rks::app::run(argc, argv); }
