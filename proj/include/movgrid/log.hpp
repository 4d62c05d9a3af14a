#pragma once

#include <functional>
#include <string>
#include <string_view>

namespace movgrid {

using WarningHandler = std::function<void(std::string_view)>;

/// Emits a non-fatal warning through the installed handler (stderr by default).
void warn(std::string_view message);

/// Installs a new handler and returns the previous one. An empty handler
/// restores the default stderr sink.
WarningHandler set_warning_handler(WarningHandler handler);

/// RAII helper that collects warnings for the lifetime of the object.
class ScopedWarningCapture {
 public:
  ScopedWarningCapture();
  ~ScopedWarningCapture();
  ScopedWarningCapture(const ScopedWarningCapture&) = delete;
  ScopedWarningCapture& operator=(const ScopedWarningCapture&) = delete;

  std::size_t count() const noexcept { return count_; }
  bool contains(std::string_view needle) const;

 private:
  WarningHandler previous_;
  std::size_t count_ = 0;
  std::string messages_;
};

}  // namespace movgrid
