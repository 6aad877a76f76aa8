#include "nirb/experiments.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace nirb;

namespace {

struct Common {
  std::vector<std::string> config_files;
  std::vector<std::string> overrides;
  std::string store;
  std::string output;
  bool quiet = false;
};

Config build_config(const Common& o) {
  Config c;
  for (const auto& f : o.config_files) {
    std::ifstream in(f);
    if (!in) throw ConfigError("config: cannot read " + f);
    std::stringstream ss;
    ss << in.rdbuf();
    c.merge(ss.str(), f);
  }
  for (const auto& s : o.overrides) c.apply_override(s);
  if (!o.store.empty()) c.set("store", o.store);
  if (!o.output.empty()) c.set("output", o.output);
  if (c.integer("threads") > 0) omp_set_num_threads(c.integer("threads"));
  return c;
}

void emit(const Config& c, const std::vector<CsvTable>& tables) {
  const std::filesystem::path dir = c.get("output");
  std::filesystem::create_directories(dir);
  for (const auto& t : tables) {
    const auto path = dir / t.name;
    std::ofstream out(path);
    out << t.text();
    if (!out) throw StoreError("cannot write " + path.string());
    std::cout << "== " << path.string() << "\n" << t.text() << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Non-intrusive reduced basis sensitivity experiments"};
  app.require_subcommand(1);
  Common o;
  auto add_common = [&o](CLI::App* sub) {
    sub->add_option("-c,--config", o.config_files, "config file, later files override earlier ones")
        ->check(CLI::ExistingFile);
    sub->add_option("-s,--set", o.overrides, "override a config key, key=value");
    sub->add_option("--store", o.store, "snapshot store directory");
    sub->add_option("-o,--output", o.output, "directory for the CSV files");
    sub->add_flag("-q,--quiet", o.quiet, "no progress messages");
  };

  auto* convergence = app.add_subcommand("convergence", "sensitivity errors over the grid ladder at one mu");
  auto* direct = app.add_subcommand("direct-tables", "leave-one-out table of the direct sensitivity variants");
  auto* adjoint = app.add_subcommand("adjoint-tables", "leave-one-out adjoint tables, clean and noisy");
  auto* bruss = app.add_subcommand("brusselator", "Brusselator tables, gradients, timings and lambda(N)");
  auto* show = app.add_subcommand("config", "print the resolved configuration");
  for (auto* sub : {convergence, direct, adjoint, bruss, show}) add_common(sub);

  auto* snapshot = app.add_subcommand("snapshot", "inspect the snapshot store");
  snapshot->require_subcommand(1);
  auto* ls = snapshot->add_subcommand("ls", "list records");
  auto* rm = snapshot->add_subcommand("rm", "remove records");
  std::vector<std::string> ids;
  rm->add_option("ids", ids, "record ids")->required();
  add_common(ls);
  add_common(rm);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const Config c = build_config(o);
    const Progress progress = o.quiet ? Progress{} : Progress([](const std::string& m) {
      std::fprintf(stderr, "%s\n", m.c_str());
    });
    if (convergence->parsed()) emit(c, cmd_convergence(c, progress));
    if (direct->parsed()) emit(c, cmd_direct_tables(c, progress));
    if (adjoint->parsed()) emit(c, cmd_adjoint_tables(c, progress));
    if (bruss->parsed()) emit(c, cmd_brusselator(c, progress));
    if (show->parsed()) {
      (void)heat_config_from(c);
      (void)brusselator_config_from(c);
      (void)coarse_order_sizes(c);
    }
    if (show->parsed()) std::cout << "# config_hash: " << c.hash() << "\n" << c.canonical();
    if (ls->parsed()) {
      SnapshotStore store(c.get("store"));
      for (const auto& e : store.list()) {
        std::printf("%s\t%llu values\tcrc %08x\n", e.id.c_str(), static_cast<unsigned long long>(e.values),
                    e.checksum);
      }
    }
    if (rm->parsed()) {
      SnapshotStore store(c.get("store"));
      int missing = 0;
      for (const auto& id : ids) {
        if (!store.remove(id)) {
          std::fprintf(stderr, "no record '%s'\n", id.c_str());
          ++missing;
        }
      }
      return missing ? 1 : 0;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const InvalidArgument& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
