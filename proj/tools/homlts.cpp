#include "homlts/cli/report.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>

int main(int argc, char** argv) {
  using namespace homlts;
  using namespace homlts::cli;

  CLI::App app{"Hom Lie triple systems: verification, equivariant cohomology, extensions and deformations"};
  std::string command, path, format = "text";
  std::size_t degree = 0, to = 0, cap = SizeLimits{}.max_tensor_entries;
  bool equivariant = false;
  app.add_option("command", command, "verify | cohomology | central-extension | extract-cocycle | "
                                     "extend-deformation | equivalence | report-all")
      ->required()
      ->check(CLI::IsMember(commands()));
  app.add_option("instance", path, "instance file")->required();
  auto* deg_opt = app.add_option("--degree", degree, "cochain degree (odd)");
  app.add_flag("--equivariant", equivariant, "use the G-invariant subcomplex");
  auto* to_opt = app.add_option("--to", to, "target order for deformations");
  app.add_option("--format", format, "report format")->check(CLI::IsMember({"text", "json"}));
  app.add_option("--max-tensor-entries", cap, "size cap on raw cochain tensors")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }

  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read instance file '" << path << "'\n";
    return exit_usage;
  }
  std::ostringstream buf;
  buf << in.rdbuf();

  Options opt;
  if (*deg_opt) opt.degree = degree;
  if (*to_opt) opt.to = to;
  opt.equivariant = equivariant;
  opt.limits.max_tensor_entries = cap;

  try {
    const InstanceDocument doc = parse_instance(buf.str());
    const Report rep = execute(doc, command, opt);
    std::cout << (format == "json" ? render_json(rep.body) : render_text(rep.body));
    return rep.exit_code;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << path << ": " << e.what() << "\n";
    return exit_usage;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return exit_usage;
  } catch (const SizeCapExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_size_cap;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_failed;
  }
}
