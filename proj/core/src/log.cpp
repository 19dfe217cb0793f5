#include "smartbeta/log.hpp"

#include <iostream>
#include <mutex>

namespace smartbeta::log {

namespace {

void default_sink(Level level, std::string_view message) {
    if (level == Level::warning) std::cerr << "warning: " << message << '\n';
}

std::mutex& sink_mutex() {
    static std::mutex m;
    return m;
}

Sink& current_sink() {
    static Sink sink = default_sink;
    return sink;
}

void emit(Level level, std::string_view message) {
    std::lock_guard lock(sink_mutex());
    if (current_sink()) current_sink()(level, message);
}

}  // namespace

Sink set_sink(Sink sink) {
    std::lock_guard lock(sink_mutex());
    std::swap(sink, current_sink());
    return sink;
}

void info(std::string_view message) { emit(Level::info, message); }
void warning(std::string_view message) { emit(Level::warning, message); }

}  // namespace smartbeta::log
