// Minimal external agent: connects to a running `roadjudge run --agent external:HOST:PORT`
// and drives one episode per connection with a hand-written policy.
//
//   roadjudge run --agent external:127.0.0.1:7700 --out out/external &
//   roadjudge_sample_agent 127.0.0.1:7700

#include <cmath>
#include <iostream>
#include <thread>

#include "roadjudge/protocol.hpp"

using namespace roadjudge;

namespace {

/// Pure pursuit on the route preview, stopping for signals and anything in the lane ahead.
class CautiousPolicy final : public Agent {
 public:
  AgentDescriptor descriptor() const override { return {"sample_cautious", AgentKind::external, kProtocolVersion}; }

  ControlCommand act(const Observation& obs) override {
    ControlCommand cmd;
    cmd.steer = steer_towards(obs);

    double target = std::min(obs.speed_limit, 8.0);
    if (obs.traffic_light && obs.traffic_light->phase != LightPhase::green && obs.traffic_light->distance > 0.5) {
      target = std::min(target, stopping_speed(obs.traffic_light->distance - 1.0));
    }
    if (obs.stop_sign_distance && !stopped_for_sign_) {
      target = std::min(target, stopping_speed(*obs.stop_sign_distance - 1.0));
      if (obs.speed < 0.05 && *obs.stop_sign_distance < 3.0) stopped_for_sign_ = true;
    }
    for (const auto& a : obs.nearby_actors) {
      const Vec2 rel = a.relative_pose.position();
      if (rel.x > 0.0 && std::abs(rel.y) < a.half_width + 1.5) {
        target = std::min(target, stopping_speed(rel.x - a.half_length - 2.3 - 4.0));
      }
    }

    const double error = target - obs.speed;
    if (error > 0.0) {
      cmd.throttle = std::clamp(0.5 * error, 0.0, 1.0);
    } else {
      cmd.brake = std::clamp(-0.4 * error, 0.0, 1.0);
    }
    return cmd;
  }

  void begin(const EpisodeStart& start) override {
    stopped_for_sign_ = false;
    std::cerr << "episode " << start.route_id << " (seed " << start.seed << ")\n";
  }

 private:
  static double stopping_speed(double distance) { return distance <= 0.0 ? 0.0 : std::sqrt(2.0 * 3.0 * distance); }

  static double steer_towards(const Observation& obs) {
    for (const auto& p : obs.route_preview) {
      const double d = norm(p.position);
      if (p.position.x > 0.0 && d >= 6.0) {
        const double curvature = 2.0 * p.position.y / (d * d);
        return std::clamp(std::atan(2.8 * curvature) / 0.6, -1.0, 1.0);
      }
    }
    return 0.0;
  }

  bool stopped_for_sign_ = false;
};

}  // namespace

int main(int argc, char** argv) {
  const Endpoint server = parse_endpoint(argc > 1 ? argv[1] : "127.0.0.1:7700");
  CautiousPolicy policy;
  int episodes = 0;
  int failures = 0;
  while (true) {
    std::unique_ptr<LineChannel> channel;
    for (int attempt = 0; !channel; ++attempt) {
      try {
        channel = tcp_connect(server);
      } catch (const ProtocolError& e) {
        // The server closes its port once the suite is done.
        if (episodes > 0 || attempt >= 50) {
          std::cerr << episodes << " episodes, " << failures << " failed\n";
          return failures == 0 ? 0 : 1;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(100));
      }
    }
    try {
      const ClientSummary s = run_client_session(*channel, policy);
      if (!s.accepted) {
        std::cerr << "refused: " << s.error << '\n';
        return 1;
      }
      std::cerr << "  " << s.termination << " after " << s.ticks << " ticks, DS "
                << s.record.value("DS", 0.0) << '\n';
    } catch (const ProtocolError& e) {
      // A server that has finished its suite drops connections still queued on its port.
      if (episodes > 0) {
        std::cerr << episodes << " episodes, " << failures << " failed\n";
        return failures == 0 ? 0 : 1;
      }
      std::cerr << "  session failed: " << e.what() << '\n';
      ++failures;
    }
    ++episodes;
  }
}
