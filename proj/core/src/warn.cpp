#include "boltz/warn.hpp"

#include <iostream>
#include <mutex>

namespace boltz {

namespace {
std::mutex g_mu;
WarningHandler& handler_ref() {
  static WarningHandler h = [](const std::string& msg) { std::cerr << "warning: " << msg << "\n"; };
  return h;
}
}  // namespace

WarningHandler set_warning_handler(WarningHandler handler) {
  std::lock_guard<std::mutex> lock(g_mu);
  WarningHandler old = handler_ref();
  handler_ref() = std::move(handler);
  return old;
}

void warn(const std::string& message) {
  std::lock_guard<std::mutex> lock(g_mu);
  if (handler_ref()) handler_ref()(message);
}

}  // namespace boltz
