"""
Attraction-repulsion dissimilarities for fair clustering
"""
