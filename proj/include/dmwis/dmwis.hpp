#pragma once

#include "dmwis/cli.hpp"
#include "dmwis/engine.hpp"
#include "dmwis/exact_solver.hpp"
#include "dmwis/generators.hpp"
#include "dmwis/global_graph.hpp"
#include "dmwis/greedy.hpp"
#include "dmwis/io.hpp"
#include "dmwis/local_graph.hpp"
#include "dmwis/partition.hpp"
#include "dmwis/reconstruct.hpp"
#include "dmwis/reductions.hpp"
#include "dmwis/solvers.hpp"
#include "dmwis/transport.hpp"
