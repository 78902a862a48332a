"""Heat-trace asymptotics for perturbed power lattices."""
