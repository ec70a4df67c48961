"""Energy-aware hover-to-hover traversal planning for Lift+Cruise QuadPlane eVTOL aircraft."""
import evtol_traversal_planner.core

__version__ = "0.1.0"
