#pragma once

namespace gisl::cli {

// Exit status: 0 success, 1 analysis failure, 2 configuration error.
int run(int argc, char** argv);

}  // namespace gisl::cli
