#pragma once

#include <cstdio>
#include <string>
#include <sys/wait.h>

struct Outcome {
  int code = -1;
  std::string out;
};

// Runs the built optlab binary with stderr discarded and logging off.
inline Outcome run(const std::string& args) {
  const std::string cmd = std::string("OPTLAB_LOG=quiet '") + OPTLAB_CLI_PATH + "' " + args + " 2>/dev/null";
  Outcome r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, got);
  const int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}
