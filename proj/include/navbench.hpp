#pragma once

// Convenience umbrella for the whole library.

#include "navbench/config.hpp"
#include "navbench/episode.hpp"
#include "navbench/errors.hpp"
#include "navbench/geometry.hpp"
#include "navbench/grid.hpp"
#include "navbench/islands.hpp"
#include "navbench/language.hpp"
#include "navbench/llm_client.hpp"
#include "navbench/mapping.hpp"
#include "navbench/metrics.hpp"
#include "navbench/planner.hpp"
#include "navbench/render_svg.hpp"
#include "navbench/report_io.hpp"
#include "navbench/rng.hpp"
#include "navbench/scene.hpp"
#include "navbench/scene_gen.hpp"
#include "navbench/scene_io.hpp"
#include "navbench/suite.hpp"
#include "navbench/valuemaps.hpp"
#include "navbench/version.hpp"
#include "navbench/vocab.hpp"
