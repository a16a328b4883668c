#include <iostream>

#include "boxtopos/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  auto res = boxtopos::cli::run(std::move(args));
  if (res.status == "ok") {
    if (res.is_text)
      std::cout << res.text;
    else
      std::cout << res.payload.dump(2) << "\n";
  } else {
    boxtopos::Json err{
        {"error",
         {{"kind", res.error_kind},
          {"message",
           res.diagnostics.empty() ? "" : res.diagnostics.front()}}}};
    std::cerr << err.dump(2) << "\n";
  }
  return res.exit_code;
}
