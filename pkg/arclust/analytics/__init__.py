"""
Dissimilarities, embeddings, clustering and fairness metrics
"""
