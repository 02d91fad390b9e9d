#pragma once

#include <string>
#include <vector>

namespace spinsync {

// Entry point shared by the binary and in-process tests. args excludes argv[0].
int cli_main(std::vector<std::string> args);

}  // namespace spinsync
