#pragma once

#include <stdexcept>
#include <string>

namespace encircle {

// Base class for all library errors so callers can catch them in one place.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Robot is (numerically) on the cylinder axis; the phase is undefined there.
class SingularRadius : public Error {
public:
    explicit SingularRadius(double rho)
        : Error("singular radius: rho=" + std::to_string(rho) + " is below the defined threshold") {}
};

class TooFewRobots : public Error {
public:
    explicit TooFewRobots(int n) : Error("need at least 2 robots, got " + std::to_string(n)) {}
};

class InvalidWindow : public Error {
public:
    explicit InvalidWindow(double s) : Error("escape window must be positive, got " + std::to_string(s)) {}
};

class StaleNeighborData : public Error {
public:
    StaleNeighborData(int robot, int staleness, int bound)
        : Error("robot " + std::to_string(robot) + ": neighbor phase is " + std::to_string(staleness)
                + " ticks old (bound " + std::to_string(bound) + ")") {}
};

class DisconnectedGraph : public Error {
public:
    explicit DisconnectedGraph(long tick)
        : Error("communication graph disconnected at tick " + std::to_string(tick)) {}
};

class NoRoute : public Error {
public:
    NoRoute(int src, int dst)
        : Error("no route from robot " + std::to_string(src) + " to robot " + std::to_string(dst)) {}
};

class DegenerateDelta : public Error {
public:
    explicit DegenerateDelta(double delta)
        : Error("consecutive phase difference must be positive, got " + std::to_string(delta)) {}
};

class NotInformed : public Error {
public:
    explicit NotInformed(int robot)
        : Error("robot " + std::to_string(robot) + " is not informed; true globals are unavailable") {}
};

class InsufficientData : public Error {
public:
    explicit InsufficientData(const std::string& what) : Error(what) {}
};

// Scenario file / override problems, reported with the offending key path.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

}  // namespace encircle
