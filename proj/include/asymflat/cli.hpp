#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace asymflat {

const char* version();

// "a,b,c" or "start:stop:xF" (geometric, factor F)
std::vector<double> parse_radii(const std::string& text);

// exit codes: 0 success, 1 usage error, 2 numerical failure
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace asymflat
