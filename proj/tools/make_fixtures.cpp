// Regenerates the stored golden prompt fixtures from the canonical test
// window. Run only when the prompt layout intentionally changes, then
// re-audit the output before committing.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "../tests/support.hpp"
#include "phenollm/prompt.hpp"

using namespace phenollm;

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fixtures <fixtures-dir>\n";
    return 2;
  }
  const std::filesystem::path dir = std::filesystem::path(argv[1]) / "prompts";
  std::filesystem::create_directories(dir);

  const FeatureWindow window = testing::canonical_window();
  for (Strategy s : all_strategies()) {
    for (DataFormat f : {DataFormat::Csv, DataFormat::Markdown,
                         DataFormat::Tabular, DataFormat::Latex}) {
      const PromptBundle bundle = build_prompt(window, s, f);
      const std::filesystem::path file =
          dir / (std::string(strategy_name(s)) + "_" + format_name(f) + ".txt");
      std::ofstream out(file, std::ios::binary | std::ios::trunc);
      out << bundle.rendered;
      std::cout << "wrote " << file.string() << "\n";
    }
  }
  return 0;
}
