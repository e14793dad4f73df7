#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "szen/cli.hpp"

int main(int argc, char** argv) {
  szen::RunOptions o;
  CLI::App app{"szen: tableau prover with superdeduction"};
  app.add_option("input", o.input, "TPTP fof problem file")->required();
  app.add_option("-I,--include", o.include_dirs, "directory searched for include() files (repeatable)");
  app.add_option("--timeout", o.timeout_seconds, "seconds before giving up")->check(CLI::PositiveNumber);
  app.add_option("--max-steps", o.max_steps, "rule application budget")->check(CLI::PositiveNumber);
  app.add_flag("--cut", o.cut, "allow cut on branch atoms");
  std::map<std::string, szen::TraceLevel> levels{
      {"trace", szen::TraceLevel::Trace}, {"skeleton", szen::TraceLevel::Skeleton}, {"status", szen::TraceLevel::Status}};
  app.add_option("--trace-level", o.trace, "trace | skeleton | status")
      ->transform(CLI::CheckedTransformer(levels, CLI::ignore_case));
  app.add_flag("--list-rules", o.list_rules, "print the compiled rule set");
  app.add_flag("--stats", o.stats, "print search statistics");
  app.add_flag("--legend", o.legend, "explain each T_n in the trace");
  bool no_relations = false;
  app.add_flag("--no-relations", no_relations, "do not detect reflexive/symmetric/transitive axioms");
  app.add_option("--tag", o.tag, "namespace shown in Extension/<tag>/<rule>");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : szen::kExitInputError;
  }
  o.detect_relations = !no_relations;
  return szen::run(o, std::cout, std::cerr);
}
